// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

// Umbrella header for the whole toolkit.

#include "tracelens/analysis.hpp"
#include "tracelens/catalog.hpp"
#include "tracelens/civil.hpp"
#include "tracelens/compare.hpp"
#include "tracelens/config.hpp"
#include "tracelens/errors.hpp"
#include "tracelens/ingest.hpp"
#include "tracelens/render.hpp"
#include "tracelens/run.hpp"
#include "tracelens/synth.hpp"
#include "tracelens/table.hpp"
#include "tracelens/trace_model.hpp"
