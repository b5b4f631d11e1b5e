/*
 * Copyright 2026 the fcmi authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FCMI_FCMI_HPP
#define FCMI_FCMI_HPP

#include "fcmi/brs_code.hpp"
#include "fcmi/cmm_pseudoinverse.hpp"
#include "fcmi/coded_protocol.hpp"
#include "fcmi/errors.hpp"
#include "fcmi/experiments.hpp"
#include "fcmi/fed_sim.hpp"
#include "fcmi/field_points.hpp"
#include "fcmi/inverse_core.hpp"
#include "fcmi/linalg.hpp"
#include "fcmi/lsq_solvers.hpp"
#include "fcmi/matrix_io.hpp"
#include "fcmi/rng.hpp"
#include "fcmi/secure_sharing.hpp"
#include "fcmi/transcript.hpp"
#include "fcmi/vandermonde.hpp"

#endif  // FCMI_FCMI_HPP
