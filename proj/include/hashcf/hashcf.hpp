// Copyright 2026 The hashcf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "hashcf/bench.hpp"
#include "hashcf/checkpoint.hpp"
#include "hashcf/config.hpp"
#include "hashcf/corpus.hpp"
#include "hashcf/dataset_io.hpp"
#include "hashcf/error.hpp"
#include "hashcf/eval.hpp"
#include "hashcf/hashindex.hpp"
#include "hashcf/model.hpp"
#include "hashcf/pipeline.hpp"
#include "hashcf/rng.hpp"
#include "hashcf/split.hpp"
#include "hashcf/synthetic.hpp"
#include "hashcf/text.hpp"
#include "hashcf/trainer.hpp"
