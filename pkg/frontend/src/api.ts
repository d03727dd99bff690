/**
 * Typed client for the loadrank HTTP API.
 *
 * Every number the console displays originates from one of these payloads;
 * the client never post-processes scores or ranks.
 */

export interface SettingDoc {
  value: number;
  baseline?: boolean;
}

export interface ApplianceDoc {
  id: string;
  kind: "HvacSetpoint" | "DimmableLight" | "PlugLoad";
  rated_power_W: number;
  settings: SettingDoc[];
}

export interface ZoneDoc {
  id: string;
  desired_temp_C: number;
  comfort_alpha: number;
  comfort_delta_C: number;
  appliances: ApplianceDoc[];
}

export interface FloorDoc {
  id: string;
  zones: ZoneDoc[];
}

export interface BuildingDoc {
  id: string;
  floor_area_m2: number;
  floors: FloorDoc[];
}

export interface CriteriaDoc {
  criteria: string[];
  weights: number[];
  nu: number;
}

export interface RankingRow {
  rank: number;
  index: number;
  appliance_id: string;
  zone_id: string;
  kind: string;
  setting_index: number;
  setting_value: number;
  label: string;
  fitness: number;
  occupied_prob: number;
  estimated_reduction_W: number;
  expected_scores: Record<string, number>;
  mean_win_prob: Record<string, number>;
  distributions: Record<string, [number, number][]>;
}

export interface RankingPayload {
  computed_at_min: number;
  horizon_min: number;
  criteria: { criteria: string[]; weights: number[]; threshold: number };
  occupied: Record<string, boolean>;
  alternatives: RankingRow[];
}

export interface ZoneState {
  temp_C: number;
  setpoint_C: number;
  occupied: boolean;
  state_minutes: number;
}

export interface SimSnapshot {
  clock_min: number;
  timestamp: string;
  outdoor_temp_C: number;
  chiller_power_W: number;
  total_power_W: number;
  zones: Record<string, ZoneState>;
  appliance_powers_W: Record<string, number>;
}

export interface SimState {
  running: boolean;
  snapshot: SimSnapshot;
  log_length: number;
  active_events: number[];
}

export interface EventInfo {
  id: number;
  status: "scheduled" | "running" | "done" | "aborted";
  start_minute: number;
  end_minute: number;
  target_reduction_W: number | null;
}

export interface EventReportDoc {
  summary: Record<string, number | boolean>;
  restored_after_min: number | null;
  series: {
    times_min: number[];
    total_power_W: number[];
    baseline_power_W: number[];
    reduction_W: number[];
  };
  zones: Record<string, Record<string, number[]>>;
  decisions: unknown[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const resp = await this.fetchImpl(this.base + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const doc = await resp.json();
        if (doc && typeof doc.detail === "string") detail = doc.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  getBuilding(): Promise<BuildingDoc> {
    return this.request("GET", "/api/building");
  }

  putBuilding(doc: BuildingDoc): Promise<{ ok: boolean; zones: number }> {
    return this.request("POST", "/api/building", doc);
  }

  getCriteria(): Promise<CriteriaDoc> {
    return this.request("GET", "/api/criteria");
  }

  putCriteria(weights: number[], nu: number): Promise<unknown> {
    return this.request("PUT", "/api/criteria", { weights, nu });
  }

  getRanking(horizonMin = 5): Promise<RankingPayload> {
    return this.request("GET", `/api/ranking?horizon_min=${horizonMin}`);
  }

  startSimulation(speed = 600, dtSeconds = 60): Promise<unknown> {
    return this.request("POST", "/api/simulation/start", { speed, dt_seconds: dtSeconds });
  }

  stopSimulation(): Promise<unknown> {
    return this.request("POST", "/api/simulation/stop");
  }

  getSimState(): Promise<SimState> {
    return this.request("GET", "/api/simulation/state");
  }

  postEvent(body: {
    start_minute: number;
    end_minute: number;
    target_reduction_W: number | "unlimited" | null;
    weights?: number[];
  }): Promise<{ id: number; status: string }> {
    return this.request("POST", "/api/events", body);
  }

  listEvents(): Promise<EventInfo[]> {
    return this.request("GET", "/api/events");
  }

  getEventReport(id: number): Promise<{ id: number; status: string; report?: EventReportDoc }> {
    return this.request("GET", `/api/events/${id}/report`);
  }

  fitModels(): Promise<unknown> {
    return this.request("POST", "/api/models/fit", {});
  }
}
