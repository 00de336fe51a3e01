/*
   Copyright 2026 The bkq Authors

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

#ifndef BKQ_ERRORS_HPP
#define BKQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bkq {

// Base of every library error. The CLI maps each subclass to an exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

// Violated operation precondition (alphabet mismatch, valuation, shapes ...).
struct PreconditionError : Error {
    using Error::Error;
};

struct BudgetError : Error {
    using Error::Error;
};

// Gram matrix indefinite or ill-conditioned, quadrature not converged.
struct ConditioningError : Error {
    using Error::Error;
};

struct NondegeneracyError : PreconditionError {
    using PreconditionError::PreconditionError;
};

struct DegenerateWeightError : PreconditionError {
    using PreconditionError::PreconditionError;
};

struct InvarianceError : PreconditionError {
    using PreconditionError::PreconditionError;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw PreconditionError(what);
}

} // namespace bkq

#endif
