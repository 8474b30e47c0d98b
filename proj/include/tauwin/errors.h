// include/tauwin/errors.h

// Copyright 2026  The tauwin authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TAUWIN_ERRORS_H_
#define TAUWIN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace tauwin {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, bad configuration, or violated preconditions.
// The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

#define TAUWIN_DECLARE_ERROR(Name, Base) \
  class Name : public Base {             \
   public:                               \
    using Base::Base;                    \
  }

TAUWIN_DECLARE_ERROR(InvalidLength, ValidationError);
TAUWIN_DECLARE_ERROR(InvalidFftSize, ValidationError);
TAUWIN_DECLARE_ERROR(LengthMismatch, ValidationError);
TAUWIN_DECLARE_ERROR(ZeroSignal, ValidationError);
TAUWIN_DECLARE_ERROR(DegenerateGrid, ValidationError);
TAUWIN_DECLARE_ERROR(TooManyTapers, ValidationError);
TAUWIN_DECLARE_ERROR(SignalTooShort, ValidationError);
TAUWIN_DECLARE_ERROR(ConfigError, ValidationError);
TAUWIN_DECLARE_ERROR(NotPowerOfTwo, ValidationError);
TAUWIN_DECLARE_ERROR(InsufficientData, ValidationError);
TAUWIN_DECLARE_ERROR(DimensionMismatch, ValidationError);
TAUWIN_DECLARE_ERROR(EmptyData, ValidationError);
TAUWIN_DECLARE_ERROR(EmptyFeatures, ValidationError);
TAUWIN_DECLARE_ERROR(DegenerateCohort, ValidationError);
TAUWIN_DECLARE_ERROR(SingleClassOnly, ValidationError);

// Runtime failures; the CLI maps these to exit code 1.
TAUWIN_DECLARE_ERROR(IoError, Error);
TAUWIN_DECLARE_ERROR(FormatError, Error);

#undef TAUWIN_DECLARE_ERROR

}  // namespace tauwin

#endif  // TAUWIN_ERRORS_H_
