#pragma once

namespace pinnreg {

/// Keeps large jet buffers on the heap instead of fresh mmap pages, which
/// otherwise dominate the cost of each training step. Call once at start-up.
void tune_allocator();

}  // namespace pinnreg
