// Copyright 2026 The GAC Authors
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

#ifndef GAC_GAC_HPP
#define GAC_GAC_HPP

#include "gac/alignment.hpp"
#include "gac/cost_model.hpp"
#include "gac/error.hpp"
#include "gac/importance.hpp"
#include "gac/model.hpp"
#include "gac/model_io.hpp"
#include "gac/pipeline.hpp"
#include "gac/presets.hpp"
#include "gac/report.hpp"
#include "gac/solver.hpp"
#include "gac/sweep.hpp"

#endif  // GAC_GAC_HPP
