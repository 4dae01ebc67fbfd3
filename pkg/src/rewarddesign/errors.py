"""Exception types shared across the library."""


class RewardDesignError(Exception):
    """Base class for all library errors."""


class InvalidDistribution(RewardDesignError):
    def __init__(self, state, action, detail):
        super().__init__(f"invalid transition distribution at (s={state}, a={action}): {detail}")
        self.state = state
        self.action = action


class InvalidDiscount(RewardDesignError):
    pass


class InvalidIndex(RewardDesignError):
    pass


class InvalidProbability(RewardDesignError):
    pass


class PolicySpaceTooLarge(RewardDesignError):
    def __init__(self, count, cap):
        super().__init__(f"policy space has {count} policies, exceeds cap {cap}")
        self.count = count
        self.cap = cap


class SingularSystem(RewardDesignError):
    pass


class EmptySoap(RewardDesignError):
    pass


class MalformedProgram(RewardDesignError):
    pass


class InconsistentOrder(RewardDesignError):
    def __init__(self, cycle):
        super().__init__(f"order relations contain a cycle: {cycle}")
        self.cycle = cycle


class StateActionMismatch(RewardDesignError):
    pass


class SearchSpaceTooLarge(RewardDesignError):
    pass


class EntropyOutOfRange(RewardDesignError):
    pass
