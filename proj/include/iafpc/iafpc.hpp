// SPDX-License-Identifier: Apache-2.0
//
// iafpc: uplink interference-aware fractional power control for two-tier
// Poisson cellular networks, analysis and simulation.
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

#ifndef IAFPC_IAFPC_HPP
#define IAFPC_IAFPC_HPP

#include "analytic_core.hpp"
#include "asymptotics.hpp"
#include "config.hpp"
#include "experiment.hpp"
#include "interference_approx.hpp"
#include "montecarlo.hpp"
#include "point_process.hpp"
#include "power_control.hpp"
#include "sinr.hpp"
#include "special_math.hpp"
#include "units.hpp"

#endif // IAFPC_IAFPC_HPP
