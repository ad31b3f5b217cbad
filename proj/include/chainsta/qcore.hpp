// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chainsta/qcore/dopri5.hpp>
#include <chainsta/qcore/numdiff.hpp>
#include <chainsta/qcore/propagate.hpp>
#include <chainsta/qcore/types.hpp>
