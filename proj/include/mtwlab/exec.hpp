#pragma once

namespace mtw {

/// Execution policy for data-parallel kernels. Serial is the reference path;
/// Parallel runs the same per-item work under OpenMP and reduces in index order,
/// so both produce identical results.
enum class Exec { Serial, Parallel };

/// Caps the OpenMP worker count (no-op without OpenMP). n <= 0 leaves the default.
void set_thread_count(int n);
[[nodiscard]] int thread_count();

}  // namespace mtw
