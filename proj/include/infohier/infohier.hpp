// Copyright 2026 The infohier Authors.
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

// Umbrella header.

#ifndef INFOHIER_INFOHIER_HPP_
#define INFOHIER_INFOHIER_HPP_

#include "infohier/abstain.hpp"
#include "infohier/config.hpp"
#include "infohier/core.hpp"
#include "infohier/eval.hpp"
#include "infohier/formats.hpp"
#include "infohier/hierbuild.hpp"
#include "infohier/label.hpp"
#include "infohier/reward.hpp"
#include "infohier/select.hpp"
#include "infohier/simtrain.hpp"

#endif  // INFOHIER_INFOHIER_HPP_
