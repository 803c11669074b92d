/*
 * Copyright 2026 The btn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "btn/bench.hpp"
#include "btn/bitvec.hpp"
#include "btn/errors.hpp"
#include "btn/factorization.hpp"
#include "btn/hierarchical_tucker.hpp"
#include "btn/hubo.hpp"
#include "btn/network.hpp"
#include "btn/nnsvd.hpp"
#include "btn/random.hpp"
#include "btn/solvers.hpp"
#include "btn/tensor.hpp"
#include "btn/tensor_io.hpp"
#include "btn/tensor_train.hpp"
#include "btn/tucker.hpp"
