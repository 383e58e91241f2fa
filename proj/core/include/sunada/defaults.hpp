#pragma once

#include <cstddef>

/// Numeric defaults shared by the library and the command-line tool.
///
/// | name                     | value   | used by                                  |
/// |--------------------------|---------|------------------------------------------|
/// | element_cap              | 20000   | group closure                            |
/// | exhaustive_search_order  | 400     | gassmann_search strategy switch          |
/// | intertwiner_tol          | 1e-10   | kernel unitarity/equivariance/constancy  |
/// | intertwiner_retries      | 8       | intertwiner_solve                        |
/// | intertwining_tol         | 1e-9    | verify_intertwining                      |
/// | trace_conjugation_tol    | 1e-8    | verify_trace_equality secondary route    |
/// | t_max                    | 50      | verify_trace_equality                    |
/// | dynamics_seeds           | 100     | seed sweeps                              |
/// | rk_abs_tol / rk_rel_tol  | 1e-11   | Dormand-Prince integrator                |
/// | closure_tol              | 1e-8    | closed-orbit closure and prime period    |
/// | min_length               | 1e-2    | prime period divisor bound               |
/// | merge_tol                | 1e-6    | orbit de-duplication                     |
/// | degeneracy_tol           | 1e-8    | det(I - P) nondegeneracy flag            |
/// | rank_tol                 | 1e-6    | SVD rank threshold for fixed sets        |
/// | spectral_gap             | 100     | retained / discarded singular value gap  |
/// | continuation_step        | 1e-2    | fixed-set continuation                   |
/// | length_coalesce_tol      | 1e-8    | LSeries length merging                   |
/// | mc_rel_error             | 1e-2    | Monte Carlo canonical volume             |
/// | richardson_tol           | 1e-8    | oscillatory quadrature grid doubling     |
/// | bump_mass_tol            | 1e-8    | mollifier normalisation                  |
namespace sunada::defaults {

inline constexpr std::size_t element_cap = 20000;
inline constexpr std::size_t exhaustive_search_order = 400;

inline constexpr double intertwiner_tol = 1e-10;
inline constexpr int intertwiner_retries = 8;
inline constexpr double intertwining_tol = 1e-9;
inline constexpr double trace_conjugation_tol = 1e-8;
inline constexpr int t_max = 50;
inline constexpr int dynamics_seeds = 100;

inline constexpr double rk_abs_tol = 1e-11;
inline constexpr double rk_rel_tol = 1e-11;
inline constexpr double closure_tol = 1e-8;
inline constexpr double min_length = 1e-2;
inline constexpr double merge_tol = 1e-6;
inline constexpr double degeneracy_tol = 1e-8;

inline constexpr double rank_tol = 1e-6;
inline constexpr double spectral_gap = 100.0;
inline constexpr double continuation_step = 1e-2;
inline constexpr double length_coalesce_tol = 1e-8;
inline constexpr double mc_rel_error = 1e-2;

inline constexpr double richardson_tol = 1e-8;
inline constexpr double bump_mass_tol = 1e-8;

}  // namespace sunada::defaults
