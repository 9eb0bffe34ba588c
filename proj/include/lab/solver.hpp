#pragma once

#include <string>
#include <vector>

#include "lab/construction.hpp"
#include "lab/field.hpp"

namespace lab {

enum class SimMode { nse, mhd };

// Time-integration knobs.  dt <= 0 picks the advective CFL step each step
// (cfl_safety * cfl_limit / (vmax * kmax)); an explicit dt is still checked
// against the bound and rejected when it violates it.
struct SimConfig {
  SimMode mode = SimMode::nse;
  int n = 64;
  double mu = 1e-3;  // viscosity
  double nu = 1e-3;  // magnetic diffusivity (mhd only)
  double dt = 0.0;
  double cfl_limit = 0.5;  // dt * max|u,b| * kmax must stay under this
  double cfl_safety = 0.5;
  double t_end = 0.1;
  long long max_steps = 100000;
  int record_every = 10;  // history row cadence, in steps
  std::vector<int> tracked_u_shells;
  std::vector<int> tracked_b_shells;
  // Besov distance to the initial state, recorded on every history row.
  double besov_r = INFINITY;
  double besov_s_u = -1.0;
  double besov_s_b = -1.0;
  int besov_oversample = 2;
  bool record_besov = true;
  bool dealias = true;              // false = aliased negative control
  bool disable_nonlinearity = false;  // pure-diffusion runs
  double blowup_factor = 1e4;  // energy growth treated as leaving the regime
};

struct SimState {
  GridSpec grid;
  SpectralField u, b;  // b unused in nse mode (kept zero-size grid n)
  double t = 0.0;
  // Running dissipation integrals, advanced by the same RK4 weights as the
  // fields so the energy-balance residual measures scheme consistency only:
  //   diss_u = integral of ||grad u||_2^2 ds   (viscosity NOT included)
  //   diss_b = integral of nu ||grad b||_2^2 ds
  double diss_u = 0.0;
  double diss_b = 0.0;
  bool mhd = false;
};

// Spectral tendencies plus the quadrature rates and the max pointwise
// velocity component seen while synthesizing (feeds the CFL check).
struct Tendencies {
  SpectralField du, db;
  double ddiss_u = 0.0;  // ||grad u||_2^2
  double ddiss_b = 0.0;  // nu ||grad b||_2^2
  double vmax = 0.0;
};

SimState make_state(const SimConfig& cfg, const SpectralField& u0, const SpectralField& b0);
SimState make_state(const SimConfig& cfg, const SpectralField& u0);  // nse

// Dense initial fields from the block construction, keeping the stages whose
// boxes fit the dealiased band of an n-grid.  require_all turns a dropped
// stage into a resolution error; otherwise at least one stage must fit.
struct DeskFields {
  GridSpec grid;
  SpectralField u0, b0;
  int stages_in_band = 0;
};
DeskFields initial_fields_in_band(const InitialData& d, int n, bool require_all = false);

// Full tendency (Leray-projected dealiased nonlinearity plus diffusion) and
// the nonlinearity alone; the stepper integrates the nonlinear part and
// applies the diffusion semigroup exactly.
Tendencies rhs(const SimState& s, const SimConfig& cfg);
Tendencies nonlinear_rhs(const SimState& s, const SimConfig& cfg);

// One integrating-factor RK4 step.  Throws cfl_rejected when dt violates the
// advective bound (state untouched), blow_up when the result leaves the
// trusted regime.
void step(SimState& s, const SimConfig& cfg, double dt);

// CFL-derived step for the current state (cfl_safety applied); falls back to
// t_end/100 when the field is too weak to constrain it.
double auto_dt(const SimState& s, const SimConfig& cfg);

// ||P~_q f||_2^2 (fat = three-shell window) or ||P_q f||_2^2 (thin).
double shell_energy(const SimState& s, int q, bool magnetic, bool fat = true);

// Instantaneous nonlinear energy input to the tracked shell: <N, P^2 f> with
// P the fat or thin shell filter and N the (Leray-projected, dealiased)
// nonlinearity of the matching field.  Signs follow the energy identities
//   d/dt ||u_q||^2/2 = B(u,u,g) - B(b,b,g) - mu ||grad u_q||^2
//   d/dt ||b_q||^2/2 = B(b,u,g) - B(u,b,g) - nu ||grad b_q||^2,  g = P^2 field.
double shell_production(const SimState& s, const SimConfig& cfg, int q, bool magnetic,
                        bool fat = true);

// sup_p 2^{ps} || (f - ref)_p ||_r over occupied shells (distance in
// B^s_{r,infinity}); grids must match.
double field_besov_distance(const SpectralField& f, const SpectralField& ref, double s, double r,
                            int oversample = 1);

struct HistoryRow {
  double t = 0.0;
  double e_u = 0.0, e_b = 0.0;    // ||u||_2^2, ||b||_2^2
  double diss_u = 0.0, diss_b = 0.0;
  std::vector<double> u_shell_e, u_shell_p;  // per tracked shell
  std::vector<double> b_shell_e, b_shell_p;
  double besov_u = 0.0, besov_b = 0.0;
};

struct SimHistory {
  SimMode mode = SimMode::nse;
  int n = 0;
  double mu = 0.0, nu = 0.0;
  bool dealias = true;
  std::vector<int> u_shells, b_shells;
  double initial_energy = 0.0;  // ||u0||^2 + ||b0||^2
  std::vector<HistoryRow> rows;
};

// Runs from t=0 to t_end recording every record_every steps (plus the first
// and last).  Tracked shells must fit the dealiased band (resolution error).
// When final_state is non-null it receives the terminal state.
SimHistory run_simulation(const SimConfig& cfg, const SpectralField& u0, const SpectralField& b0,
                          SimState* final_state = nullptr);
SimHistory run_simulation(const SimConfig& cfg, const SpectralField& u0,
                          SimState* final_state = nullptr);

// max over rows of |E(t) + 2 mu diss_u + 2 diss_b - E(0)| / E(0): the energy
// inequality as a near-equality scheme diagnostic.
double energy_balance_residual(const SimHistory& h);

// t,E_u,E_b,diss_u,diss_b,<per-shell e/p columns>,besov_u,besov_b
std::string history_csv(const SimHistory& h);

}  // namespace lab
