#pragma once

// Ledger CSV and binary state snapshots.
//
// Snapshot layout: one ASCII line "CHNS1 nx ny lx ly t\n" followed by
// little-endian IEEE-754 doubles for phi, mu, sigma, p (cells, row by row),
// then the u faces and the v faces.

#include <iosfwd>
#include <string>

#include "chns/diagnostics.hpp"
#include "chns/state.hpp"

namespace chns {

inline constexpr const char* kLedgerHeader =
    "step,t,kinetic,free_energy,total_energy,diss_visc,diss_mu,diss_cross,oono_work,bel_residual,"
    "mean_phi,mean_sigma,sep_delta,div_inf,sigma_l4,newton_iters";

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

void write_ledger_csv(const EnergyLedger& series, std::ostream& out);
void write_ledger_csv(const EnergyLedger& series, const std::string& path);
EnergyLedger read_ledger_csv(std::istream& in);
EnergyLedger read_ledger_csv(const std::string& path);

void write_snapshot(const SimState& s, std::ostream& out);
void write_snapshot(const SimState& s, const std::string& path);
SimState read_snapshot(std::istream& in);
SimState read_snapshot(const std::string& path);

}  // namespace chns
