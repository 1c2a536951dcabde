#pragma once

#include "tdjsarc/baselines.hpp"
#include "tdjsarc/channel.hpp"
#include "tdjsarc/config.hpp"
#include "tdjsarc/env.hpp"
#include "tdjsarc/episode.hpp"
#include "tdjsarc/errors.hpp"
#include "tdjsarc/experiment.hpp"
#include "tdjsarc/io.hpp"
#include "tdjsarc/mlp.hpp"
#include "tdjsarc/ppo.hpp"
#include "tdjsarc/rng.hpp"
#include "tdjsarc/sar.hpp"
#include "tdjsarc/scenario.hpp"
#include "tdjsarc/secrecy.hpp"
#include "tdjsarc/units.hpp"
