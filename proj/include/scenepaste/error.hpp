// Copyright 2026 The scenepaste Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace scenepaste {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input files that fail to parse or violate their format contract.
class LoadError : public Error {
public:
    using Error::Error;
};

// Bad keys/values in the pipeline config or camera file.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Filesystem failures while writing outputs.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace scenepaste
