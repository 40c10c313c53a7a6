#ifndef BSUB_BSUB_HPP
#define BSUB_BSUB_HPP

// Behavior subtraction video analytics: learn per-pixel background activity
// from a training video, then flag pixels whose activity exceeds it.

#include "bsub/behavior.hpp"
#include "bsub/components.hpp"
#include "bsub/config.hpp"
#include "bsub/descriptor.hpp"
#include "bsub/detect.hpp"
#include "bsub/event.hpp"
#include "bsub/image.hpp"
#include "bsub/io.hpp"
#include "bsub/markov.hpp"
#include "bsub/motion.hpp"
#include "bsub/pipeline.hpp"
#include "bsub/synth.hpp"

#endif  // BSUB_BSUB_HPP
