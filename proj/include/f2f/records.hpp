// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include "f2f/types.hpp"

namespace f2f {

using Json = nlohmann::json;

void to_json(Json& j, const GenerationParams& p);
void from_json(const Json& j, GenerationParams& p);

void to_json(Json& j, const TemporalCaption& c);
void from_json(const Json& j, TemporalCaption& c);

void to_json(Json& j, const FrameSelection& s);
void from_json(const Json& j, FrameSelection& s);

void to_json(Json& j, const EvalRecord& r);
void from_json(const Json& j, EvalRecord& r);

}  // namespace f2f
