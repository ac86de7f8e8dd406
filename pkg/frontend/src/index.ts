export { ApiClient, ApiError } from './api';
export type { CreateSessionBody, FetchLike } from './api';
export { BoardState, chainToHtml } from './board';
export type { AnchorView, ChainRenderModel, GapView } from './board';
export { buildPreview, partitionCurves } from './preview';
export type { BarSeries, LineSeries, PreviewModel } from './preview';
export { applyEdit, applyEdits, ChainEditError, chainTotal, decodeValues } from './validate';
export { Wizard } from './wizard';
export type { PanelKind } from './wizard';
export type * from './types';
