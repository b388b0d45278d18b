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
#ifndef NSLMM_ERRORS_HPP
#define NSLMM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nslmm
{

/// Invalid input to an operation (wrong dimension, negative argument, ...).
class argument_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// The operation is well-formed but not available for this object,
/// e.g. the exact solution of a problem that has none.
class unsupported_error : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// A run or study configuration that cannot be executed as given.
class configuration_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace nslmm

#endif // NSLMM_ERRORS_HPP
