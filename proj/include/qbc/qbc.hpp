// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qbc/config.hpp"
#include "qbc/decay.hpp"
#include "qbc/error.hpp"
#include "qbc/nogo.hpp"
#include "qbc/numeric_policy.hpp"
#include "qbc/optics.hpp"
#include "qbc/protocol.hpp"
#include "qbc/quantum.hpp"
#include "qbc/random.hpp"
#include "qbc/stats.hpp"
#include "qbc/transcript_io.hpp"
