// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "svdb/compress.hpp"
#include "svdb/dda.hpp"
#include "svdb/errors.hpp"
#include "svdb/frozen.hpp"
#include "svdb/io.hpp"
#include "svdb/macrocell.hpp"
#include "svdb/metrics.hpp"
#include "svdb/render.hpp"
#include "svdb/rng.hpp"
#include "svdb/sample.hpp"
#include "svdb/synth.hpp"
#include "svdb/transfer.hpp"
#include "svdb/tree.hpp"
#include "svdb/vec.hpp"
#include "svdb/volume.hpp"
