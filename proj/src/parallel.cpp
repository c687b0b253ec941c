// SPDX-License-Identifier: Apache-2.0
//
#include "platewave/parallel.hpp"

#include <atomic>

namespace platewave {

namespace {
std::atomic<int> g_workers{1};
}  // namespace

void set_worker_count(int workers) { g_workers.store(workers > 0 ? workers : 1); }

int worker_count() { return g_workers.load(); }

}  // namespace platewave
