// Copyright 2026 The ribridge Authors
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

#ifndef RIBRIDGE_SRC_NNLS_HPP_
#define RIBRIDGE_SRC_NNLS_HPP_

#include "ribridge/core.hpp"

namespace ribridge::detail {

/// Lawson-Hanson active-set solver for min ||A x - b||_2 subject to x >= 0.
Vector nnls(const Matrix& A, const Vector& b, int max_outer = 0);

}  // namespace ribridge::detail

#endif  // RIBRIDGE_SRC_NNLS_HPP_
