// Copyright 2026 The jumplab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace jumplab {

/// Worker count: hardware concurrency, capped by JUMPLAB_THREADS if set.
int worker_count();

/// Runs task(0..n-1) on up to `workers` threads (0 = worker_count()).
/// Each index is executed exactly once; tasks write to their own slots, so
/// results do not depend on scheduling. Returns one entry per index, null
/// where the task completed and the captured exception otherwise.
std::vector<std::exception_ptr> parallel_for(std::size_t n,
                                             const std::function<void(std::size_t)>& task,
                                             int workers = 0);

}  // namespace jumplab
