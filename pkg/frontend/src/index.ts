export {
  RemoteEnv,
  RemoteEnvError,
  SequenceError,
  type RemoteEnvOptions,
  type StepInfo,
  type StepResult,
  type TraceRow,
} from './client.js';
export {
  decode,
  encodeReset,
  encodeStep,
  ErrorReason,
  Kind,
  ProtocolError,
  type ServerMsg,
  type StateMsg,
} from './protocol.js';
