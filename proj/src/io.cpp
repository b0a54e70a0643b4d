#include "chns/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

#include "chns/error.hpp"

namespace chns {
namespace {

constexpr int kColumns = 16;

void put_le(std::ostream& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  std::array<char, 8> b;
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
  out.write(b.data(), 8);
}

double get_le(std::istream& in) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw FormatError("snapshot: truncated data");
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

template <class Range>
void put_all(std::ostream& out, const Range& r) {
  for (double x : r) put_le(out, x);
}

template <class Range>
void get_all(std::istream& in, Range&& r) {
  for (double& x : r) x = get_le(in);
}

double parse_double(std::string_view s, const char* what) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size())
    throw FormatError(std::string(what) + ": bad number '" + std::string(s) + "'");
  return x;
}

long long parse_integer(std::string_view s, const char* what) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size())
    throw FormatError(std::string(what) + ": bad integer '" + std::string(s) + "'");
  return x;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 32> buf;
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  (void)ec;
  return std::string(buf.data(), p);
}

void write_ledger_csv(const EnergyLedger& series, std::ostream& out) {
  out << kLedgerHeader << '\n';
  for (const LedgerRow& r : series.rows()) {
    out << r.step;
    for (double x : {r.t, r.kinetic, r.free_energy, r.total_energy, r.diss_visc, r.diss_mu, r.diss_cross,
                     r.oono_work, r.bel_residual, r.mean_phi, r.mean_sigma, r.sep_delta, r.div_inf, r.sigma_l4})
      out << ',' << format_double(x);
    out << ',' << r.newton_iters << '\n';
  }
}

void write_ledger_csv(const EnergyLedger& series, const std::string& path) {
  std::ofstream out = open_out(path);
  write_ledger_csv(series, out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

EnergyLedger read_ledger_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kLedgerHeader) throw FormatError("ledger: unexpected header");
  EnergyLedger ledger;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto c = rest.find(',');
      f.push_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest = rest.substr(c + 1);
    }
    if (static_cast<int>(f.size()) != kColumns)
      throw FormatError("ledger line " + std::to_string(line_no) + ": expected 16 fields");
    LedgerRow r;
    r.step = parse_integer(f[0], "ledger");
    double* cols[] = {&r.t,           &r.kinetic,  &r.free_energy, &r.total_energy, &r.diss_visc,
                      &r.diss_mu,     &r.diss_cross, &r.oono_work, &r.bel_residual, &r.mean_phi,
                      &r.mean_sigma,  &r.sep_delta, &r.div_inf,    &r.sigma_l4};
    for (int k = 0; k < 14; ++k) *cols[k] = parse_double(f[k + 1], "ledger");
    r.newton_iters = static_cast<int>(parse_integer(f[15], "ledger"));
    ledger.append(r);
  }
  return ledger;
}

EnergyLedger read_ledger_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_ledger_csv(in);
}

void write_snapshot(const SimState& s, std::ostream& out) {
  const GridSpec& g = s.grid();
  out << "CHNS1 " << g.nx << ' ' << g.ny << ' ' << format_double(g.lx) << ' ' << format_double(g.ly) << ' '
      << format_double(s.t) << '\n';
  put_all(out, s.phi.values());
  put_all(out, s.mu.values());
  put_all(out, s.sigma.values());
  put_all(out, s.pressure.values());
  put_all(out, s.vel.u_values());
  put_all(out, s.vel.v_values());
}

void write_snapshot(const SimState& s, const std::string& path) {
  std::ofstream out = open_out(path);
  write_snapshot(s, out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

SimState read_snapshot(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("snapshot: missing header");
  std::istringstream hs(header);
  std::string magic, snx, sny, slx, sly, st, extra;
  hs >> magic >> snx >> sny >> slx >> sly >> st;
  if (magic != "CHNS1") throw FormatError("snapshot: bad magic '" + magic + "' (expected CHNS1)");
  if (st.empty() || (hs >> extra)) throw FormatError("snapshot: malformed header");
  GridSpec g{static_cast<int>(parse_integer(snx, "snapshot")), static_cast<int>(parse_integer(sny, "snapshot")),
             parse_double(slx, "snapshot"), parse_double(sly, "snapshot")};
  try {
    g.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
  SimState s(g);
  s.t = parse_double(st, "snapshot");
  get_all(in, s.phi.values());
  get_all(in, s.mu.values());
  get_all(in, s.sigma.values());
  get_all(in, s.pressure.values());
  get_all(in, s.vel.u_values());
  get_all(in, s.vel.v_values());
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("snapshot: trailing data");
  return s;
}

SimState read_snapshot(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_snapshot(in);
}

}  // namespace chns
