#pragma once

#include "matjack/cores.hpp"
#include "matjack/errors.hpp"
#include "matjack/harness.hpp"
#include "matjack/jack.hpp"
#include "matjack/matrix_source.hpp"
#include "matjack/nystrom.hpp"
#include "matjack/rng.hpp"
#include "matjack/rsvd.hpp"
#include "matjack/testmat.hpp"
