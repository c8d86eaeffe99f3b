/**
 * GFC2 wire protocol: one fixed little-endian binary layout.
 *
 * Datagram: magic 'GFC2' | version u8 | kind u8 | seq u32 LE | payload.
 *
 * RESET (0)   empty payload, or an 8-byte unsigned LE seed
 * STEP  (1)   M doubles (LE), motor commands in [0, 1]
 * STATE (128) simTime f64 | setpoint 3*f64 deg/s | gyro 3*f64 deg/s |
 *             rotor speed M*f64 RPM | reward f64 | done u8
 * ERROR (129) reason u8 | optional UTF-8 message
 */

export const MAGIC = Buffer.from('GFC2', 'ascii');
export const VERSION = 1;

export enum Kind {
  Reset = 0,
  Step = 1,
  State = 128,
  Error = 129,
}

export enum ErrorReason {
  Malformed = 1,
  Version = 2,
  Length = 3,
  Kind = 4,
  Sequence = 5,
  Done = 6,
}

const HEADER_SIZE = 4 + 1 + 1 + 4;

export interface StateMsg {
  kind: Kind.State;
  seq: number;
  simTime: number;
  setpoint: [number, number, number];
  gyro: [number, number, number];
  rotorRpm: number[];
  reward: number;
  done: boolean;
}

export interface ErrorMsg {
  kind: Kind.Error;
  seq: number;
  reason: ErrorReason;
  message: string;
}

export type ServerMsg = StateMsg | ErrorMsg;

export class ProtocolError extends Error {}

function header(kind: Kind, seq: number): Buffer {
  const buf = Buffer.alloc(HEADER_SIZE);
  MAGIC.copy(buf, 0);
  buf.writeUInt8(VERSION, 4);
  buf.writeUInt8(kind, 5);
  buf.writeUInt32LE(seq >>> 0, 6);
  return buf;
}

export function encodeReset(seq: number, seed?: bigint): Buffer {
  const head = header(Kind.Reset, seq);
  if (seed === undefined) {
    return head;
  }
  const payload = Buffer.alloc(8);
  payload.writeBigUInt64LE(seed, 0);
  return Buffer.concat([head, payload]);
}

export function encodeStep(seq: number, commands: readonly number[]): Buffer {
  const payload = Buffer.alloc(8 * commands.length);
  commands.forEach((u, i) => payload.writeDoubleLE(u, 8 * i));
  return Buffer.concat([header(Kind.Step, seq), payload]);
}

export function decode(data: Buffer): ServerMsg {
  if (data.length < HEADER_SIZE) {
    throw new ProtocolError(`datagram too short (${data.length} bytes)`);
  }
  if (!data.subarray(0, 4).equals(MAGIC)) {
    throw new ProtocolError(`bad magic ${data.subarray(0, 4).toString('hex')}`);
  }
  const version = data.readUInt8(4);
  if (version !== VERSION) {
    throw new ProtocolError(`unsupported protocol version ${version}`);
  }
  const kind = data.readUInt8(5);
  const seq = data.readUInt32LE(6);
  const payload = data.subarray(HEADER_SIZE);

  if (kind === Kind.Error) {
    if (payload.length < 1) {
      throw new ProtocolError('ERROR payload missing reason byte');
    }
    return {
      kind: Kind.Error,
      seq,
      reason: payload.readUInt8(0),
      message: payload.subarray(1).toString('utf-8'),
    };
  }

  if (kind === Kind.State) {
    const fixed = 8 * 8 + 1; // 8 doubles + done byte
    if (payload.length < fixed + 8 || (payload.length - fixed) % 8 !== 0) {
      throw new ProtocolError(`bad STATE payload length ${payload.length}`);
    }
    const m = (payload.length - fixed) / 8;
    const f64 = (i: number) => payload.readDoubleLE(8 * i);
    const rotorRpm: number[] = [];
    for (let i = 0; i < m; i++) {
      rotorRpm.push(f64(7 + i));
    }
    return {
      kind: Kind.State,
      seq,
      simTime: f64(0),
      setpoint: [f64(1), f64(2), f64(3)],
      gyro: [f64(4), f64(5), f64(6)],
      rotorRpm,
      reward: f64(7 + m),
      done: payload.readUInt8(8 * (8 + m)) !== 0,
    };
  }

  throw new ProtocolError(`unexpected message kind ${kind} from server`);
}
