#pragma once
#include <string>

namespace rs::behavior {

enum class BehaviorState { kGBFree, kTrailing, kOvertake, kReactive };

inline const char* to_string(BehaviorState s) {
  switch (s) {
    case BehaviorState::kGBFree: return "GBFree";
    case BehaviorState::kTrailing: return "Trailing";
    case BehaviorState::kOvertake: return "Overtake";
    case BehaviorState::kReactive: return "Reactive";
  }
  return "?";
}

// Boolean conditions driving the transitions. Derivations live with the
// harness: opp = tracked opponent near the forthcoming line, ot = valid
// overtake available, done = overtake completed, ofc = out of control,
// ic = back in control.
struct TransitionInputs {
  bool opp = false;
  bool ot = false;
  bool done = false;
  bool ofc = false;
  bool ic = false;
};

// Total transition function. Out-of-control preempts everything; Reactive
// exits only on in-control; otherwise the race logic applies with self-loops
// for unmatched inputs.
BehaviorState transition(BehaviorState state, const TransitionInputs& in);

}  // namespace rs::behavior
