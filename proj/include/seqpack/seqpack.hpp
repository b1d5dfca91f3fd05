/* Copyright 2026 The seqpack Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include "seqpack/compare.hpp"
#include "seqpack/corpus.hpp"
#include "seqpack/emitter.hpp"
#include "seqpack/error.hpp"
#include "seqpack/io.hpp"
#include "seqpack/longdoc.hpp"
#include "seqpack/manifest_io.hpp"
#include "seqpack/metrics.hpp"
#include "seqpack/stats.hpp"
#include "seqpack/strategies.hpp"
#include "seqpack/types.hpp"
#include "seqpack/verify.hpp"
