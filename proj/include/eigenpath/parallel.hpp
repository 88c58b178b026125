// Copyright 2026 The Eigenpath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EIGENPATH_PARALLEL_HPP_
#define EIGENPATH_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace eigenpath {

// Worker cap from EIGENPATH_THREADS, else the hardware concurrency (min 1).
std::size_t worker_count();

// Calls body(i) for i in [0, n) on up to worker_count() threads. Callers
// write results into slot i so the outcome never depends on scheduling. The
// first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace eigenpath

#endif  // EIGENPATH_PARALLEL_HPP_
