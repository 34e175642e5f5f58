"""BlowupInstanton 项目主模块"""
