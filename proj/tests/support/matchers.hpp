// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "tracelens/errors.hpp"

// CHECK_THROWS_MATCHES(expr, tracelens::Error, HasCode(Errc::...))
inline auto HasCode(tracelens::Errc code) {
  return Catch::Matchers::Predicate<tracelens::Error>(
      [code](const tracelens::Error& e) { return e.code() == code; },
      std::string("error code is ") + tracelens::errc_name(code));
}
