#pragma once
#include <vector>

#include "lab/symbols.hpp"

namespace lab {

// Knobs for the ill-posedness initial data.  theta scales the velocity
// amplitudes (lambda_q^-theta per stage), gamma the magnetic ones when mhd
// is set.  c is the block half-width as a fraction of the shell radius; the
// default 1/8 keeps every block inside its shell's plateau.
struct ConstructionParams {
  double theta = 2.0;
  double gamma = 2.0;  // read only when mhd
  double c = 0.125;
  int q1 = 3;      // first occupied shell
  int stages = 4;  // number of lacunary stages J
  bool mhd = false;
  // The magnetic construction keeps the velocity to the psi1 packets; set
  // this to also give the velocity the psi2 packets at weight lambda^-theta
  // (the alternative reading of the displayed data).
  bool mhd_velocity_includes_psi2 = false;
  long long budget = 5000000;  // max modes to enumerate when materializing
};

// Rejects out-of-range parameters; the exception message names the violated
// condition.
void validate_params(const ConstructionParams& p);

// q_1 < q_2 < ... < q_J where each q_{j+1} is the smallest integer above q_j
// satisfying the amplitude-vs-flux growth conditions:
//   NSE:  (4-theta) q_j <= (2 theta-3) q_{j+1}
//   MHD adds  (4-theta) q_j <= (2 gamma-3) q_{j+1}
//        and  (4-gamma) q_j <= (theta+gamma-3) q_{j+1}
std::vector<int> lacunary_sequence(const ConstructionParams& p);

// The three block shapes of one stage (starred variants are negations):
//   L: [l, (1+c)l] x [-cl, cl]^2            at l = 2^q      -> shell q
//   M: [-ch, ch]^2 x [h, (1+c)h]            at h = 2^(q-1)  -> shell q-1
//   N = L + M (componentwise interval sums)                 -> shell q
struct StageBlocks {
  int stage = 0;  // j, 0-based
  int q = 0;      // q_j
  Box3 L, M, N;
};

// Builds the integer boxes and verifies each sits inside the plateau of its
// shell (|k| in [2^q, 1.5*2^q], where the shell multiplier is exactly 1).
// Throws on empty blocks or residence failures, naming the offending block.
StageBlocks build_blocks(int stage, int q, double c);

// psi1: e2-symbol on L and L*, +/- i (e2-e1)-symbol on N and N*.
// psi2: e1-symbol on M and M*.
// Coefficients here are bare (amplitude weight 1).
std::vector<PsiBlock> psi1_blocks(const StageBlocks& sb);
std::vector<PsiBlock> psi2_blocks(const StageBlocks& sb);

// Enumerates blocks into spectral modes.  Refuses (budget_exceeded) when the
// combined lattice point count of the blocks exceeds the budget.
SparseField materialize(const std::vector<PsiBlock>& blocks, long long budget);

struct InitialData {
  ConstructionParams params;
  std::vector<int> q;  // lacunary shells, one per stage
  // Exact symbolic description (all stages).  For NSE u_blocks carries
  // psi1 + psi2; for MHD u_blocks is psi1 only and b_blocks is psi2.
  std::vector<PsiBlock> u_blocks;
  std::vector<PsiBlock> b_blocks;
  // Modes of the stages that fit the enumeration budget (in stage order,
  // stopping at the first stage that does not fit).
  SparseField u0, b0;
  std::vector<char> stage_materialized;

  // stages whose blocks are present in u0/b0
  int materialized_stages() const {
    int n = 0;
    for (char f : stage_materialized) n += (f != 0);
    return n;
  }

  // Per-shell pieces, for the norm-scaling tables.  The stage-j velocity
  // splits into a piece at shell q_j (the psi1 packets) and one at shell
  // q_j - 1 (the psi2 packets, NSE only); the magnetic piece of stage j
  // also sits at shell q_j - 1.
  std::vector<PsiBlock> u_piece_high(int j) const;
  std::vector<PsiBlock> u_piece_low(int j) const;
  std::vector<PsiBlock> b_piece(int j) const;
};

// Assembles the full construction and verifies the cheap invariants:
// pairwise block disjointness, exact Hermitian symmetry and mode counts of
// the materialized part, and divergence-freeness.
InitialData build_initial_data(const ConstructionParams& p);

}  // namespace lab
