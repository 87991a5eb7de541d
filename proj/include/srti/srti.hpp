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

#ifndef SRTI_SRTI_HPP
#define SRTI_SRTI_HPP

#include "srti/baseline.hpp"
#include "srti/combine.hpp"
#include "srti/core.hpp"
#include "srti/enumerate.hpp"
#include "srti/io.hpp"
#include "srti/pipeline.hpp"
#include "srti/random.hpp"
#include "srti/seedgen.hpp"

#endif  // SRTI_SRTI_HPP
