// Copyright 2026 The surface7 Authors
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

// Everything except surface7/io.hpp, which additionally needs libcrypto.

#pragma once

#include "surface7/device.hpp"
#include "surface7/errors.hpp"
#include "surface7/experiment.hpp"
#include "surface7/fit.hpp"
#include "surface7/lindblad.hpp"
#include "surface7/measurement.hpp"
#include "surface7/parallel.hpp"
#include "surface7/qop.hpp"
#include "surface7/schedule.hpp"
