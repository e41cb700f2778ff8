#!/usr/bin/env python
import json
import os

import semcom_tools.exceptions


class ConfigJson:
    """Packaged defaults for every tunable of the simulator"""

    def __init__(
        self,
        json_file=os.path.join(os.path.dirname(__file__), "conf", "configuration.json"),
    ):
        with open(json_file, "r", encoding="utf-8") as fh:
            self.json_data = json.load(fh)
        self.topic_config = list(self.json_data.keys())

    def get_configuration(self, topic):
        """Obtain the topic configuration from json data"""
        if topic in self.topic_config:
            return self.json_data[topic]
        return None

    def get_topic_data(self, topic, found):
        """Obtain from topic any forward items from json data"""
        if found in self.json_data[topic]:
            return self.json_data[topic][found]
        for value in self.json_data[topic].values():
            if isinstance(value, dict) and found in value:
                return value[found]
        return None

    def require_topic_data(self, topic, found):
        """Same as get_topic_data but a missing default is a packaging bug"""
        value = self.get_topic_data(topic, found)
        if value is None:
            raise semcom_tools.exceptions.DomainError(
                f"no packaged default for {topic}.{found}"
            )
        return value
