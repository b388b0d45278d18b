/*
 * Copyright (C) 2026 The nslmm authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef NSLMM_NSLMM_HPP
#define NSLMM_NSLMM_HPP

#include "nslmm/denominator.hpp"
#include "nslmm/errors.hpp"
#include "nslmm/experiments.hpp"
#include "nslmm/format.hpp"
#include "nslmm/integrate.hpp"
#include "nslmm/methods.hpp"
#include "nslmm/problems.hpp"
#include "nslmm/qualprops.hpp"

#endif // NSLMM_NSLMM_HPP
