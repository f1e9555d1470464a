/*
   Copyright 2026 The geninv Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include "geninv/core_ops.hpp"
#include "geninv/numerics.hpp"
#include "geninv/set_inverse.hpp"
#include "geninv/pseudo_inverse.hpp"
#include "geninv/least_norm_qp.hpp"
#include "geninv/structured_inverse.hpp"
#include "geninv/applied.hpp"
#include "geninv/endofunction.hpp"
#include "geninv/vanishing.hpp"
