// Copyright 2026 The contactig Authors
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

#ifndef CONTACTIG_CONTACTIG_HPP_
#define CONTACTIG_CONTACTIG_HPP_

#include "contactig/config.hpp"
#include "contactig/contact_model.hpp"
#include "contactig/design_gradient.hpp"
#include "contactig/errors.hpp"
#include "contactig/gaussian.hpp"
#include "contactig/info_gain.hpp"
#include "contactig/mode_estimator.hpp"
#include "contactig/nelder_mead.hpp"
#include "contactig/presets.hpp"
#include "contactig/random.hpp"
#include "contactig/signals.hpp"
#include "contactig/sysid.hpp"
#include "contactig/trace.hpp"

#endif  // CONTACTIG_CONTACTIG_HPP_
