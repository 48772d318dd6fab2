// SPDX-License-Identifier: Apache-2.0
//
// mucomp: multicell MU-MIMO cooperative transmission with limited feedback
// Copyright (C) 2026 The mucomp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef MUCOMP_MUCOMP_HPP
#define MUCOMP_MUCOMP_HPP

#include "bounds.hpp"
#include "channel.hpp"
#include "codebook.hpp"
#include "codebook_io.hpp"
#include "feedback.hpp"
#include "link.hpp"
#include "linalg.hpp"
#include "metrics.hpp"
#include "montecarlo.hpp"
#include "numfmt.hpp"
#include "parallel.hpp"
#include "precoding.hpp"
#include "random.hpp"
#include "scenario.hpp"
#include "scheduling.hpp"

#endif
