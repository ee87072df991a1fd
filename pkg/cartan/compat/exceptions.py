class CompatException(ValueError):
    pass


class NoUsableCurve(CompatException):
    """
    Every sampled curve failed before its endpoint data could be computed
    """


class ConditionNotApplicable(CompatException):
    pass
