#pragma once

namespace fpspec {

/// Worker count for internal parallelism: hardware concurrency, capped by the
/// FPSPEC_THREADS environment variable when it holds a positive integer.
int default_thread_count();

} // namespace fpspec
