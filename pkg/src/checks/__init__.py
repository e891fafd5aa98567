# Check package
from __future__ import annotations
from typing import List

from checks.base import BaseCheck
from checks.interference import (
    DirectVisibilityCheck,
    InterferometerConsistencyCheck,
    MomentRealizationCheck,
    SignCaveatCheck,
)
from checks.oracle import ClosedFormMomentCheck, DetectionOrderCheck, DeterminantValueCheck
from checks.positivity import HankelSoundnessCheck, NoFalsePositiveCheck
from checks.twirl import NonpositivityCheck, ReconstructionCheck, TwirlLawCheck


def all_checks() -> List[BaseCheck]:
    """実行順に並べた検証スロット"""
    return [
        ClosedFormMomentCheck(),
        DeterminantValueCheck(),
        DetectionOrderCheck(),
        TwirlLawCheck(),
        NonpositivityCheck(),
        ReconstructionCheck(),
        HankelSoundnessCheck(),
        DirectVisibilityCheck(),
        MomentRealizationCheck(),
        InterferometerConsistencyCheck(),
        NoFalsePositiveCheck(),
        SignCaveatCheck(),
    ]
