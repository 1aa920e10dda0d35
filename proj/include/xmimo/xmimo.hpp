#pragma once

// Umbrella header for the 2x2 MIMO X-network link-level library.

#include "xmimo/channel.hpp"
#include "xmimo/common.hpp"
#include "xmimo/constellation.hpp"
#include "xmimo/decoder.hpp"
#include "xmimo/receiver.hpp"
#include "xmimo/rng.hpp"
#include "xmimo/schemes.hpp"
#include "xmimo/sim.hpp"
#include "xmimo/stbc.hpp"
#include "xmimo/verify.hpp"
