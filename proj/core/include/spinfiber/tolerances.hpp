#pragma once

/// Default numerical tolerances. Every value here can be overridden per call
/// through the optional tolerance parameters of the operations that use it.
namespace spinfiber::tol {

inline constexpr double symmetry_check = 1e-12;      // relative asymmetry accepted by eig_sym4
inline constexpr double jacobi_off_diagonal = 1e-14; // sweep convergence, relative to the Frobenius norm
inline constexpr int jacobi_max_sweeps = 50;

inline constexpr double exp_log_roundtrip = 1e-10;
inline constexpr double branch_cut_imag = 1e-8;   // relative imaginary part below which an eigenvalue counts as real
inline constexpr double singularity = 1e-13;      // relative eigenvalue/pivot magnitude treated as zero

inline constexpr double factorization = 1e-10;    // reconstruction and right-isometry residuals
inline constexpr double generator_identity = 1e-10;
inline constexpr double isometry_check = 1e-10;
inline constexpr double intertwining = 1e-9;

inline constexpr double anticommutator = 1e-12;

inline constexpr double orthonormality = 1e-10;
inline constexpr double grid_uniformity = 1e-12;  // relative deviation allowed in uniform axis spacing

inline constexpr double lattice_alignment = 1e-9; // relative snap distance for lattice shifts
inline constexpr double norm_preservation = 1e-10;

} // namespace spinfiber::tol
