/**
 * Gym-style client for a rotorbench lockstep server.
 *
 * All physics and reward math stay server-side; the client only assembles
 * the observation [e, e - ePrev] (deg/s) from the STATE setpoint and gyro
 * fields, exactly as the in-process environment does.  Calls are strictly
 * synchronous: one datagram in flight, each step() resolves only after its
 * STATE reply (the lockstep rendezvous).
 */

import * as dgram from 'node:dgram';
import {
  decode,
  encodeReset,
  encodeStep,
  ErrorMsg,
  Kind,
  ProtocolError,
  StateMsg,
} from './protocol.js';

export interface RemoteEnvOptions {
  host: string;
  port: number;
  timeoutMs?: number;
}

export interface StepInfo {
  simTime: number;
  setpoint: [number, number, number];
  gyro: [number, number, number];
  rotorRpm: number[];
}

export type StepResult = [
  observation: number[],
  reward: number,
  done: boolean,
  info: StepInfo,
];

/** One CSV-comparable trace row: t, sp, gyro, u, rpm, reward. */
export interface TraceRow {
  t: number;
  setpoint: [number, number, number];
  gyro: [number, number, number];
  u: number[];
  rpm: number[];
  reward: number;
}

export class RemoteEnvError extends Error {}

export class SequenceError extends RemoteEnvError {
  constructor(public readonly serverMessage: string) {
    super(`lockstep sequence violated: ${serverMessage}`);
  }
}

export class RemoteEnv {
  private sock: dgram.Socket;
  private readonly host: string;
  private readonly port: number;
  private readonly timeoutMs: number;
  private seq = 0;
  private inFlight = false;
  private ePrev: [number, number, number] = [0, 0, 0];
  /** Motor count, learned from the first STATE reply. */
  motorCount = 0;

  private constructor(opts: RemoteEnvOptions) {
    this.host = opts.host;
    this.port = opts.port;
    this.timeoutMs = opts.timeoutMs ?? 2000;
    this.sock = dgram.createSocket('udp4');
  }

  /** Connect and handshake via RESET; caches the motor count. */
  static async connect(opts: RemoteEnvOptions): Promise<RemoteEnv> {
    const env = new RemoteEnv(opts);
    await env.reset();
    return env;
  }

  close(): void {
    this.sock.close();
  }

  private roundTrip(datagram: Buffer): Promise<StateMsg> {
    if (this.inFlight) {
      throw new RemoteEnvError('one request at a time: previous call still pending');
    }
    this.inFlight = true;
    return new Promise<StateMsg>((resolve, reject) => {
      const timer = setTimeout(() => {
        cleanup();
        reject(new RemoteEnvError(`timeout after ${this.timeoutMs} ms`));
      }, this.timeoutMs);

      const onMessage = (data: Buffer) => {
        cleanup();
        let msg;
        try {
          msg = decode(data);
        } catch (err) {
          reject(err instanceof ProtocolError ? err : new RemoteEnvError(String(err)));
          return;
        }
        if (msg.kind === Kind.Error) {
          reject(errorFor(msg));
          return;
        }
        resolve(msg);
      };
      const onError = (err: Error) => {
        cleanup();
        reject(err);
      };
      const cleanup = () => {
        clearTimeout(timer);
        this.sock.off('message', onMessage);
        this.sock.off('error', onError);
        this.inFlight = false;
      };

      this.sock.once('message', onMessage);
      this.sock.once('error', onError);
      this.sock.send(datagram, this.port, this.host, (err) => {
        if (err) {
          onError(err);
        }
      });
    });
  }

  private observe(state: StateMsg): number[] {
    const e: [number, number, number] = [
      state.setpoint[0] - state.gyro[0],
      state.setpoint[1] - state.gyro[1],
      state.setpoint[2] - state.gyro[2],
    ];
    const obs = [...e, e[0] - this.ePrev[0], e[1] - this.ePrev[1], e[2] - this.ePrev[2]];
    this.ePrev = e;
    return obs;
  }

  /** Start a fresh episode; same seed means an identical episode. */
  async reset(seed?: bigint): Promise<number[]> {
    const state = await this.roundTrip(encodeReset(this.seq, seed));
    this.seq = (this.seq + 1) >>> 0;
    this.motorCount = state.rotorRpm.length;
    this.ePrev = [0, 0, 0];
    return this.observe(state);
  }

  /** One lockstep simulation step under the given motor commands. */
  async step(action: readonly number[]): Promise<StepResult> {
    if (this.motorCount > 0 && action.length !== this.motorCount) {
      throw new RemoteEnvError(
        `action length ${action.length} does not match motor count ${this.motorCount}`,
      );
    }
    const state = await this.roundTrip(encodeStep(this.seq, action));
    this.seq = (this.seq + 1) >>> 0;
    const obs = this.observe(state);
    const info: StepInfo = {
      simTime: state.simTime,
      setpoint: state.setpoint,
      gyro: state.gyro,
      rotorRpm: state.rotorRpm,
    };
    return [obs, state.reward, state.done, info];
  }

  /** step() that also records the CSV-comparable trace row. */
  async stepRecorded(action: readonly number[]): Promise<[StepResult, TraceRow]> {
    const result = await this.step(action);
    const info = result[3];
    const row: TraceRow = {
      t: info.simTime,
      setpoint: info.setpoint,
      gyro: info.gyro,
      u: [...action],
      rpm: info.rotorRpm,
      reward: result[1],
    };
    return [result, row];
  }
}

function errorFor(msg: ErrorMsg): RemoteEnvError {
  if (msg.reason === 5) {
    return new SequenceError(msg.message);
  }
  if (msg.reason === 2) {
    return new RemoteEnvError(`protocol version mismatch: ${msg.message}`);
  }
  return new RemoteEnvError(`server error ${msg.reason}: ${msg.message}`);
}
