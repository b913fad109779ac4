// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <functional>

namespace mhjb {

/// 0 means "all hardware threads".
std::size_t resolve_workers(std::size_t requested) noexcept;

/// Runs body(begin, end) over a static partition of [0, count) on up to
/// `workers` threads. The partition only decides who computes what, never
/// the order of floating-point operations inside an item. The first
/// exception thrown by any chunk is rethrown on the caller.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace mhjb
