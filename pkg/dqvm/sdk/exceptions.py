# Copyright 2026 The dqvm authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


class DQVMException(Exception):
    pass


# reader

class ParseError(DQVMException):
    def __init__(self, msg, offset):
        self.msg = msg
        self.offset = offset
        super().__init__(f"{msg} at byte offset {offset}")


class UnbalancedParens(ParseError):
    pass


class TrailingInput(ParseError):
    pass


class EmptyInput(ParseError):
    pass


# grammar

class GrammarError(DQVMException):
    def __init__(self, msg, expr=None):
        self.msg = msg
        self.expr = expr
        if expr is not None:
            msg = f"{msg}: {expr}"
        super().__init__(msg)


class UnknownOperator(GrammarError):
    pass


class ArityError(GrammarError):
    pass


class BadSignal(GrammarError):
    pass


class BadAngle(GrammarError):
    pass


class BadName(GrammarError):
    pass


class DistributedOpInLocalContext(GrammarError):
    pass


class ShapeError(GrammarError):
    pass


class MixedNameKindError(GrammarError):
    pass


# quantum and classical state

class StateError(DQVMException):
    pass


class DuplicateQubit(StateError):
    pass


class NonNormalizedInput(StateError):
    pass


class UnknownQubit(StateError):
    pass


class SameQubit(StateError):
    pass


class AlreadyMeasured(StateError):
    pass


class ZeroProbabilityBranch(StateError):
    def __init__(self, qubit, outcome, probability):
        self.qubit = qubit
        self.outcome = outcome
        self.probability = probability
        super().__init__(
            f"Outcome {outcome} of qubit {qubit} has probability {probability:.3e}")


class OrderMismatch(StateError):
    pass


class LengthMismatch(StateError):
    pass


# execution

class ExecutionError(DQVMException):
    pass


class UnboundSignal(ExecutionError):
    pass


class UnboundOutcome(UnboundSignal):
    def __init__(self, qubit):
        self.qubit = qubit
        super().__init__(f"Outcome of qubit '{qubit}' is not bound")


class UnboundInput(UnboundSignal):
    def __init__(self, name):
        self.name = name
        super().__init__(f"Classical input '{name}' is not bound")


class CommunicationInLocalRun(ExecutionError):
    pass


class OwnershipViolation(ExecutionError):
    def __init__(self, agent, qubit, owner):
        self.agent = agent
        self.qubit = qubit
        self.owner = owner
        super().__init__(
            f"Agent '{agent}' cannot operate on qubit {qubit} owned by {owner or 'nobody'}")


class ChannelTypeError(ExecutionError):
    pass


class DeadlockError(ExecutionError):
    def __init__(self, blocked):
        # blocked maps agent name to the command it is waiting on
        self.blocked = dict(blocked)
        details = ', '.join(f"{agent} at {cmd}" for agent, cmd in self.blocked.items())
        super().__init__(f"Deadlock: no agent can progress ({details})")


class NondeterministicResource(ExecutionError):
    pass


# patterns

class PatternError(DQVMException):
    pass


class InvalidPattern(PatternError):
    def __init__(self, violations, name=None):
        self.violations = list(violations)
        self.name = name
        header = f"Pattern '{name}' is invalid" if name else "Pattern is invalid"
        lines = '; '.join(str(v) for v in self.violations)
        super().__init__(f"{header}: {lines}")


class NameCollision(PatternError):
    pass


class MissingParam(PatternError):
    pass


class UnknownParam(PatternError):
    pass


# composition

class CompositionError(DQVMException):
    pass


class CycleDetected(CompositionError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        path = ' -> '.join(str(n) for n in self.cycle)
        super().__init__(f"Composition graph has a cycle: {path}")


class ConflictingBinding(CompositionError):
    pass


class ArityMismatch(CompositionError):
    pass


class InvalidLink(CompositionError):
    pass


# networks

class NetworkError(DQVMException):
    pass


class UnclaimedResourceQubit(NetworkError):
    pass


class DanglingChannel(NetworkError):
    pass


class InvalidChannelPair(NetworkError):
    pass


class PairMismatch(NetworkError):
    pass


# definition files

class DefinitionError(DQVMException):
    pass


class DefinitionNotFound(DefinitionError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"No definition named '{name}'")


class DuplicateDefinition(DefinitionError):
    pass


# run configuration

class RunConfigError(DQVMException):
    pass
