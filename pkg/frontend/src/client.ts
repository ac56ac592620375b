// Typed wrapper over the gateway wire protocol. Every mutation of the
// simulation goes through these five endpoints; the console holds no
// other channel to the cell.

export interface TcpPose {
  position: [number, number, number];
  rotvec: [number, number, number];
}

export interface RobotSnapshot {
  joints: number[];
  tcp: TcpPose;
  gripper: { aperture: number; mode: string; holding: boolean };
  attached: { object: string; mass_kg: number } | null;
  safety: string;
  tick: number;
}

export interface CameraInfo {
  width: number;
  height: number;
  origin: [number, number];
  pixels_per_meter: number;
}

export interface StatusSnapshot {
  robot: RobotSnapshot;
  active_job: { job_id: string; kind: string; state: string } | null;
  queue_depth: number;
  camera: CameraInfo;
}

export interface EventRecord {
  seq: number;
  tick: number;
  source: string;
  payload: Record<string, unknown>;
}

export interface CommandReply {
  reply: string;
  job_id?: string;
}

export interface Frame {
  width: number;
  height: number;
  pixels: Uint8Array; // row-major grayscale, one byte per pixel
}

/** Parse a binary PGM (P5, maxval <= 255) camera frame. */
export function parsePgm(data: ArrayBuffer): Frame {
  const bytes = new Uint8Array(data);
  if (bytes[0] !== 0x50 || bytes[1] !== 0x35) {
    throw new Error("not a P5 PGM frame");
  }
  const fields: number[] = [];
  let pos = 2;
  while (fields.length < 3) {
    while (pos < bytes.length && isSpace(bytes[pos])) pos++;
    if (bytes[pos] === 0x23) {
      // comment line
      while (pos < bytes.length && bytes[pos] !== 0x0a) pos++;
      continue;
    }
    let value = 0;
    while (pos < bytes.length && !isSpace(bytes[pos])) {
      value = value * 10 + (bytes[pos] - 0x30);
      pos++;
    }
    fields.push(value);
  }
  pos++; // single whitespace byte before the payload
  const [width, height] = fields;
  return { width, height, pixels: bytes.slice(pos, pos + width * height) };
}

function isSpace(b: number): boolean {
  return b === 0x20 || b === 0x0a || b === 0x0d || b === 0x09;
}

export class GatewayClient {
  constructor(readonly baseUrl: string, readonly sessionId: string = "console") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.baseUrl + path, init);
    const body = (await resp.json()) as T & { error?: string };
    if (!resp.ok) {
      throw new GatewayError(body.error ?? `HTTP ${resp.status}`, resp.status);
    }
    return body;
  }

  sendCommand(utterance: string, tick: number): Promise<CommandReply> {
    return this.json<CommandReply>("/v1/command", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        session_id: this.sessionId,
        channel: "console",
        utterance,
        tick,
      }),
    });
  }

  getStatus(): Promise<StatusSnapshot> {
    return this.json<StatusSnapshot>("/v1/status");
  }

  getEvents(since: number): Promise<{ events: EventRecord[]; next: number }> {
    return this.json(`/v1/events?since=${since}`);
  }

  control(action: "estop" | "restart" | "inject_collision"): Promise<{ ok: boolean; safety: string }> {
    return this.json("/v1/control", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ action }),
    });
  }

  async getFrame(): Promise<Frame> {
    const resp = await fetch(this.baseUrl + "/v1/frame");
    if (!resp.ok) throw new GatewayError(`HTTP ${resp.status}`, resp.status);
    return parsePgm(await resp.arrayBuffer());
  }
}

export class GatewayError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}
