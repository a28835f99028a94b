#pragma once

namespace sep {

/// Worker cap for batch processing: the SEP_THREADS environment variable
/// when set to a positive integer, otherwise the OpenMP default.
int batch_thread_cap();

}  // namespace sep
