#include "racestack/behavior/state_machine.hpp"

namespace rs::behavior {

BehaviorState transition(BehaviorState state, const TransitionInputs& in) {
  if (in.ofc) return BehaviorState::kReactive;

  switch (state) {
    case BehaviorState::kGBFree:
      if (in.opp) return BehaviorState::kTrailing;
      return BehaviorState::kGBFree;

    case BehaviorState::kTrailing:
      if (!in.opp) return BehaviorState::kGBFree;
      if (in.ot) return BehaviorState::kOvertake;
      return BehaviorState::kTrailing;

    case BehaviorState::kOvertake:
      if (in.done) return BehaviorState::kGBFree;
      if (!in.ot) return BehaviorState::kTrailing;
      return BehaviorState::kOvertake;

    case BehaviorState::kReactive:
      if (in.ic) return BehaviorState::kGBFree;
      return BehaviorState::kReactive;
  }
  return state;
}

}  // namespace rs::behavior
