#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wermer/bi_poly.hpp"
#include "wermer/branches.hpp"
#include "wermer/log_domain.hpp"

namespace wermer {

enum class Mode { Wermer, Modified };
std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

struct GridConfig {
  double z_grid = 32.0;      // samples per unit length
  double w_grid = 32.0;
  double margin = 0.5;       // selection safety factor
  int max_stage = 4;
  std::uint64_t seed = 1;
  int rays = 8;              // sublevel-boundary rays per root (selection)
  int p1_samples = 64;       // z points for the dense-root check
  double verify_factor = 2.0;
};

/// log-domain slack the selectors demand beyond each inequality.
double selection_slack(const GridConfig& cfg);

/// Stage n: ε_n = 2^{-eps_exp}, p_n = δ_n Π_s (w − h_s).  rho holds ρ_{n+1}.
/// Z holds Z_n once it has been computed (needed for stage n+1).
struct Stage {
  int n = 1;
  double c = 1.0;
  std::int64_t eps_exp = 1;
  int m = 1;
  double log_delta = 0.0;
  double rho = 1.0;
  BiPoly<mp_cplx> p;
  std::optional<ZPoly> Z;

  double log_eps() const;
  double eps() const { return std::exp(log_eps()); }
  double delta() const { return std::exp(log_delta); }
};

enum class Predicate { P1, P2, C1, C2, XXX, ES4, ES1, ES11, LEV1 };
std::string to_string(Predicate p);
Predicate parse_predicate(const std::string& s);
inline constexpr Predicate kAllPredicates[] = {Predicate::P1, Predicate::P2, Predicate::C1,  Predicate::C2,  Predicate::XXX,
                                               Predicate::ES4, Predicate::ES1, Predicate::ES11, Predicate::LEV1};

/// worst_margin ≥ 0 ⇔ pass.  Margins are in nats (log ratios) except P1,
/// which is log(tol / error) as well.  Predicates that do not apply at a
/// stage are reported with applicable = false and pass = true.
struct VerificationReport {
  int stage = 0;
  Predicate predicate = Predicate::P1;
  double worst_margin = 0.0;
  cplx worst_z = 0.0, worst_w = 0.0;
  std::size_t samples = 0;
  bool applicable = true;
  bool pass = true;
};

struct Construction {
  Mode mode = Mode::Modified;
  BranchPointTable table;
  std::vector<Stage> stages;
  std::vector<VerificationReport> reports;
  GridConfig config;

  int built() const { return int(stages.size()); }
  const Stage& stage(int n) const { return stages.at(n - 1); }
  /// c_1..c_n, Z_0..Z_{n−1}; Z_k for k < n must be known.
  StageFunctionSet functions(int n) const;
  bool all_pass() const;
};

Construction make_construction(Mode mode, const GridConfig& cfg);
Stage init_stage1(const BranchPointTable& table, const GridConfig& cfg, Mode mode = Mode::Modified);

/// (c_n/10) · inf over |z| = n+1 of |Z_{n−1}β_n| / |Z_n B_{n+1}| (before margins).
double analytic_c_cap(const StageFunctionSet& fs, const ZPoly& Zn, const Cut& cut_next);
double select_c(const Construction& con, int n, const ZPoly& Zn);
double select_rho(const Construction& con, int n);

struct NextPoly {
  BiPoly<mp_cplx> p;
  double log_delta;
};
/// R_n = Z_n² Π_{l≤n}(z − a_l)² (z − a_{n+1}).
UniPoly<mp_cplx> radicand(const ZPoly& Zn, const BranchPointTable& table, int n);
NextPoly build_p_next(const Construction& con, int n, double c, const ZPoly& Zn, double rho_next);

/// ceil(2^n · max(0, −min_log)), at least 1.
int m_from_min_log(double min_log, int n);
int select_m(const Construction& con, int n, const StageFunctionSet& fs_next, double log_delta_next);
std::int64_t select_eps(const Construction& con, int n, const StageFunctionSet& fs_next, double log_delta_next,
                        int m_next);

/// Appends stage n+1 and its reports; the input is untouched on failure.
Construction advance(const Construction& con);
Construction build(Mode mode, const GridConfig& cfg, int stages);

std::vector<VerificationReport> verify_stage(const Construction& con, int n);

struct Lev1Diagnostic {
  std::vector<double> log_values;  // log(ε_n^{1/2^n})
  bool decreasing = false;
};
Lev1Diagnostic lev1_from_log_eps(const std::vector<double>& log_eps);
Lev1Diagnostic check_lev1(const Construction& con);

}  // namespace wermer
