// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include "qrtlab/constants.hpp"
#include "qrtlab/errors.hpp"
#include "qrtlab/rng.hpp"
#include "qrtlab/parallel.hpp"
#include "qrtlab/qcore.hpp"
#include "qrtlab/pauli.hpp"
#include "qrtlab/haar.hpp"
#include "qrtlab/clifford.hpp"
#include "qrtlab/resources.hpp"
#include "qrtlab/qrt.hpp"
#include "qrtlab/twirl.hpp"
#include "qrtlab/protocol.hpp"
#include "qrtlab/dynamics.hpp"
