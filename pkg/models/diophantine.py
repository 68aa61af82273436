"""
Models for approximation by N + N*alpha and {1, alpha} segment partitions
"""
from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field

from core.exactnum import ALPHA, ONE, QuadNum, ZERO


class SegmentKind(str, Enum):
    """Length of one segment"""
    ONE = "one"
    ALPHA = "alpha"

    @property
    def length(self) -> QuadNum:
        return ONE if self is SegmentKind.ONE else ALPHA


class ApproxResult(BaseModel):
    """x = m1 + m2*alpha + err"""
    m1: int = Field(..., ge=0)
    m2: int = Field(..., ge=0)
    err: QuadNum

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "m1": 7,
                "m2": 0,
                "err": {"rat": ["0", "1"], "irr": ["0", "1"]}
            }
        },
    )

    @property
    def value(self) -> QuadNum:
        return QuadNum(self.m1, self.m2)


class SegmentPartition(BaseModel):
    """Consecutive segments of length 1 or alpha starting at `start`"""
    start: QuadNum = ZERO
    labels: List[SegmentKind] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)

    def length(self) -> QuadNum:
        total = ZERO
        for label in self.labels:
            total = total + label.length
        return total

    def counts(self) -> tuple[int, int]:
        ones = sum(1 for label in self.labels if label is SegmentKind.ONE)
        return ones, len(self.labels) - ones

    def nodes(self) -> List[QuadNum]:
        """Segment endpoints, start and end included"""
        out = [self.start]
        for label in self.labels:
            out.append(out[-1] + label.length)
        return out


class IntervalExtension(BaseModel):
    """Extension of a tiled inner interval to [0, K'(1+alpha))"""
    delta: QuadNum
    m1: int = Field(..., ge=0)
    m2: int = Field(..., ge=0)
    first: SegmentPartition
    middle: SegmentPartition
    last: SegmentPartition

    model_config = ConfigDict(frozen=True)

    def segments(self) -> List[SegmentKind]:
        return list(self.first.labels) + list(self.middle.labels) + list(self.last.labels)


class ThresholdReport(BaseModel):
    """Certified approximation threshold"""
    eps: str
    threshold: int = Field(..., ge=0, description="N(eps)")
    horizon: QuadNum
    resolution: str
    scanned_points: int
