#pragma once

namespace cards::par {

/// Thread cap from the CARDS_THREADS environment variable (0 = uncapped).
/// Read once; set_thread_cap overrides (used by tests and the CLI).
int thread_cap();
void set_thread_cap(int cap);

/// Number of OpenMP threads a parallel region may use after the cap.
int active_threads();

}  // namespace cards::par
