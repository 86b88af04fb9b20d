#pragma once

// c10's logging header defines a CHECK macro of its own; torch has to come
// first so doctest's definition is the one left standing.
#include <torch/torch.h>
#undef CHECK
#include "doctest.h"
